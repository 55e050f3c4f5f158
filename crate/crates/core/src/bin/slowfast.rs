fn main() -> std::process::ExitCode {
    slowfast::cli::main()
}
