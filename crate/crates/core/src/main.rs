fn main() {
    std::process::exit(gossip_core::harness::cli_main(std::env::args_os()));
}
