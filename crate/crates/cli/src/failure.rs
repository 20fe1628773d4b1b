use std::fmt;

/// A failure classified by exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Input(String),
    Internal(String),
}

impl Failure {
    pub const USAGE: u8 = 1;
    pub const INPUT: u8 = 2;
    pub const INTERNAL: u8 = 3;

    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => Self::USAGE,
            Failure::Input(_) => Self::INPUT,
            Failure::Internal(_) => Self::INTERNAL,
        }
    }

    pub fn input(msg: impl fmt::Display) -> Self {
        Failure::Input(msg.to_string())
    }

    pub fn usage(msg: impl fmt::Display) -> Self {
        Failure::Usage(msg.to_string())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Internal(m) => f.write_str(m),
        }
    }
}

impl From<trajseg::Error> for Failure {
    fn from(e: trajseg::Error) -> Self {
        match e {
            trajseg::Error::EmptyTarget => Failure::Input("empty mask".into()),
            trajseg::Error::Config(_) => Failure::Usage(e.to_string()),
            e if e.is_input_format() => Failure::Input(e.to_string()),
            e => Failure::Internal(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(format!("i/o: {e}"))
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;
