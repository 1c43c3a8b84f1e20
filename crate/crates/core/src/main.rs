fn main() {
    std::process::exit(integrator_reach::cli::run(std::env::args_os()));
}
