fn main() {
    std::process::exit(commacat::cli::main_exit());
}
