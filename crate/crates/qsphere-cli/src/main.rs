fn main() {
    std::process::exit(qsphere_cli::commands::run());
}
