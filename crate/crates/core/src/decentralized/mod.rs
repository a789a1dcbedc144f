//! Multiple distributed players sharing the arms without communication.
//!
//! Synchronized players rotate over the arms with pre-agreed offsets; the
//! asynchronous variant needs neither global time nor offsets and reacts to
//! observed collisions by re-drawing uniformly among its top arms.

mod players;
mod slot;

pub use players::{async_exploit_choice, sync_action, AsyncPlayer, SyncPlayer};
pub use slot::{evolve_system, resolve_slot, CollisionModel, RestlessModel, SlotOutcome};

/// Offset arithmetic `((k − 1) mod l) + 1`, with values in `1..=l`.
pub fn oslash(k: usize, l: usize) -> usize {
    debug_assert!(k >= 1 && l >= 1);
    (k - 1) % l + 1
}
