//! TriG-Messages: TriG statements with a `VERSION "1.2-messages"` header and
//! `MESSAGE` lines closing each message.

mod lexer;
mod parser;
mod writer;

pub use parser::{parse_trig_message, parse_trigm, parse_trigm_with_prefixes, ParserEvent, TrigmParser};
pub use writer::{write_trig_message, write_trigm};
