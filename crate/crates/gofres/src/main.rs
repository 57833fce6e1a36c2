fn main() -> std::process::ExitCode {
    gofres::cli::main()
}
