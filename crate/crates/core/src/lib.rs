//! Decoders and a Monte Carlo harness for CSS codes with generalized-LDPC
//! (Tanner) structure.
//!
//! The central decoder runs flooding message passing on each classical
//! Tanner graph and soft-decodes every check node's local view with a
//! list-based guessing decoder ([`sogrand`]) fed by an ordered-reliability
//! pattern generator ([`orbgrand`]). Scaled min-sum BP ([`bp`]) and ordered
//! statistics post-processing ([`osd`]) serve as baselines.

pub mod bp;
pub mod channel;
pub mod code;
pub mod gf2;
pub mod gldpc;
pub mod harness;
pub mod numeric;
pub mod orbgrand;
pub mod osd;
pub mod sogrand;
