fn main() {
    std::process::exit(modcalc::cli::main_from_env());
}
