fn main() {
    std::process::exit(kysharp::cli::main_entry());
}
