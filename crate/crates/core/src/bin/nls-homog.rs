fn main() -> std::process::ExitCode {
    nls_homog::harness::cli::main()
}
