pub mod concentration;
pub mod dp_audit;
pub mod loss_curve;
pub mod privacy_probe;
pub mod wager_demo;

pub use concentration::cmd_concentration;
pub use dp_audit::cmd_dp_audit;
pub use loss_curve::cmd_loss_curve;
pub use privacy_probe::cmd_privacy_probe;
pub use wager_demo::cmd_wager_demo;
