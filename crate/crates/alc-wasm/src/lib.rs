//! WebAssembly bindings for the alc playground.
