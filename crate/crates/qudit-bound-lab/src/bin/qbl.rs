fn main() {
    std::process::exit(qudit_bound_lab::cli::run());
}
