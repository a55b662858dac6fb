fn main() {
    std::process::exit(growfem::cli::cli_main(std::env::args_os()));
}
