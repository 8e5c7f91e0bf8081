//! Van Kampen diagrams.
