mod cli;
mod suite;
