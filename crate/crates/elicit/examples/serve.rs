//! Runs the elicitation service on a local port.
//!
//! `cargo run --example serve -- [port]`, then for instance
//! `curl -X POST localhost:8080/sessions -H 'content-type: application/json'
//! -d '{"names": ["John rides", "Mary rides", "Soccer game"]}'`.

use std::net::SocketAddr;

use qcn_elicit::{serve, ServiceConfig};

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let port: u16 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(8080);
    let cfg = ServiceConfig {
        snapshot_dir: None,
        cors: true,
    };
    serve(SocketAddr::from(([127, 0, 0, 1], port)), cfg).await
}
