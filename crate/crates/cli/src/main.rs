fn main() {
    let code = schrogeo::main_with_args(
        std::env::args_os(),
        std::env::var(schrogeo::config::SEED_ENV).ok(),
    );
    std::process::exit(code);
}
