fn main() -> std::process::ExitCode {
    orbifold_tqm::cli::main_entry()
}
