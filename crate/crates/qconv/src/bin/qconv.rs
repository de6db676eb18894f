fn main() {
    std::process::exit(qconv::cli::main_entry());
}
