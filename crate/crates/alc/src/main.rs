use clap::Parser;

fn main() {
    let inv = alc::cli::Invocation::parse();
    std::process::exit(alc::cli::run(inv));
}
