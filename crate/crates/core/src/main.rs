use clap::Parser;

fn main() {
    let config = qtree::cli::RunConfig::parse();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = qtree::cli::run(&config, &mut stdout.lock(), &mut stderr.lock());
    std::process::exit(code);
}
