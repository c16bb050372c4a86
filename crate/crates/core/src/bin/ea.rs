use clap::Parser;
use effalg::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let outcome = run(&cli);
    if outcome.exit_code == 2 {
        eprint!("{}", outcome.stdout);
    } else {
        print!("{}", outcome.stdout);
    }
    std::process::exit(outcome.exit_code);
}
