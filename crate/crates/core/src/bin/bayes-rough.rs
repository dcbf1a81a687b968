use std::process::ExitCode;

fn main() -> ExitCode {
    bayes_rough::cli::main()
}
