fn main() {
    std::process::exit(fermi_rdm::cli::main_with_args(std::env::args_os()));
}
