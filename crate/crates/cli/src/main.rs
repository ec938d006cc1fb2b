fn main() {
    std::process::exit(pcoeq_cli::cmd_dispatch(std::env::args_os()));
}
