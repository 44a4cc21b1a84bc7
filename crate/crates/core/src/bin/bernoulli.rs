fn main() {
    let code = bernoulli_density::cli::run(std::env::args_os());
    bernoulli_density::cli::flush();
    std::process::exit(code);
}
