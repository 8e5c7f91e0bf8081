//! Group presentations associated to a machine.
