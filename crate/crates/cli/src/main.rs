use std::process::ExitCode;

fn main() -> ExitCode {
    let out = rkhs_cli::execute(std::env::args_os());
    if out.usage {
        eprint!("{}", out.text);
    } else {
        print!("{}", out.text);
    }
    ExitCode::from(out.exit_code)
}
