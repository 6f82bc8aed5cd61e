use env_logger::Env;

fn main() {
    env_logger::Builder::from_env(Env::new().filter("CYCLEWALK_LOG").write_style("CYCLEWALK_LOG_STYLE"))
        .format_timestamp(None)
        .init();
    std::process::exit(cyclewalk::cli::run(std::env::args_os()));
}
