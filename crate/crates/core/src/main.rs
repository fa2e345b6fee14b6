use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" {
        print!("{}", dp_image::cli::usage());
        return ExitCode::SUCCESS;
    }
    match dp_image::cli::run(&args) {
        Ok(summary) => {
            println!("{}", summary.trim_end());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!(
                "error[{}]: {}",
                e.category(),
                e.to_string().replace('\n', " ")
            );
            ExitCode::FAILURE
        }
    }
}
