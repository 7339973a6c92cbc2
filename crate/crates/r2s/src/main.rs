use std::process::ExitCode;

fn main() -> ExitCode {
    // Restore default SIGPIPE handling so `r2s ... | head` ends quietly
    // instead of panicking on a closed pipe.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    ExitCode::from(r2s::cli::run(std::env::args_os()))
}
