//! Holds the `acceptance` test target, which runs the end-to-end checks
//! after every other suite in the workspace. Nothing is exported.
