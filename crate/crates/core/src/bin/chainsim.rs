fn main() -> std::process::ExitCode {
    subradiant_chain::cli::main()
}
