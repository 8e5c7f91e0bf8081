//! Exact free Burnside group oracle for tiny exponents.
