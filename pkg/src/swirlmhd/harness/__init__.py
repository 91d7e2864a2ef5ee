"""Configuration, corpora, verification suites and the command line."""
