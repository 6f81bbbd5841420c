//! Holds the `acceptance` test target, which exercises `scod-core` and
//! `scod-bench` together. The library itself is empty.
