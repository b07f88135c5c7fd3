fn main() {
    std::process::exit(minimax_design::cli::main());
}
