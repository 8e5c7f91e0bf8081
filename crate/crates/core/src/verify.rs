//! Named verification suites for the structural lemmas.
