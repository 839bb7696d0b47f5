// Copyright 2026 The Emblem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Live operator service.
//!
//! The simulation runs on its own task and is the only owner of the world.
//! It talks to the rest of the service through two queues: operator
//! commands in, tick output out. A hub task fans tick output to every
//! connected session and keeps the open-request set so late joiners are
//! resynchronized. Commands are applied only at tick boundaries.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::time::Duration;

use futures_util::{SinkExt, StreamExt};
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::{mpsc, oneshot, watch};
use tokio_tungstenite::tungstenite::protocol::frame::coding::CloseCode;
use tokio_tungstenite::tungstenite::protocol::CloseFrame;
use tokio_tungstenite::tungstenite::Message;

use crate::sim::{OperatorCommand, RunResult, Simulation, TickOutput};
use crate::wire::{parse_client_message, ProtocolViolation, ServerMessage};

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("cannot bind {addr}: {source}")]
    BindFailure { addr: String, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServeOptions {
    /// Wall-clock time per simulation tick.
    pub tick_interval: Duration,
}

pub async fn bind(addr: &str) -> Result<TcpListener, ServeError> {
    TcpListener::bind(addr).await.map_err(|source| ServeError::BindFailure { addr: addr.to_string(), source })
}

enum Outgoing {
    Text(String),
    Close,
}

enum HubEvent {
    Register(u64, mpsc::UnboundedSender<Outgoing>),
    Unregister(u64),
    Tick(TickOutput),
    Shutdown(oneshot::Sender<()>),
}

/// Last known phase per engagement plus the open requests.
#[derive(Default)]
struct ConsoleView {
    phases: BTreeMap<String, ServerMessage>,
    pending: BTreeMap<String, ServerMessage>,
}

impl ConsoleView {
    fn observe(&mut self, m: &ServerMessage) {
        match m {
            ServerMessage::StateUpdate { engagement_id, phase, .. } => {
                if phase != "AwaitingOperator" {
                    self.pending.remove(engagement_id);
                }
                self.phases.insert(engagement_id.clone(), m.clone());
            }
            ServerMessage::AbortRequest { engagement_id, .. } => {
                self.pending.insert(engagement_id.clone(), m.clone());
            }
            ServerMessage::Ack(_) | ServerMessage::Error { .. } => {}
        }
    }

    fn resync(&self) -> impl Iterator<Item = &ServerMessage> {
        self.phases.values().chain(self.pending.values())
    }
}

async fn hub(mut events: mpsc::UnboundedReceiver<HubEvent>, initial: Vec<ServerMessage>) {
    let mut view = ConsoleView::default();
    for m in &initial {
        view.observe(m);
    }
    let mut sessions: BTreeMap<u64, mpsc::UnboundedSender<Outgoing>> = BTreeMap::new();
    while let Some(ev) = events.recv().await {
        match ev {
            HubEvent::Register(id, tx) => {
                for m in view.resync() {
                    let _ = tx.send(Outgoing::Text(m.to_text()));
                }
                sessions.insert(id, tx);
            }
            HubEvent::Unregister(id) => {
                sessions.remove(&id);
            }
            HubEvent::Tick(out) => {
                for m in &out.messages {
                    view.observe(m);
                    let text = m.to_text();
                    for tx in sessions.values() {
                        let _ = tx.send(Outgoing::Text(text.clone()));
                    }
                }
                for (session, ack) in out.acks {
                    if let Some(tx) = sessions.get(&session) {
                        let _ = tx.send(Outgoing::Text(ServerMessage::Ack(ack).to_text()));
                    }
                }
            }
            HubEvent::Shutdown(done) => {
                for tx in sessions.values() {
                    let _ = tx.send(Outgoing::Close);
                }
                let _ = done.send(());
                return;
            }
        }
    }
}

async fn session(
    id: u64,
    stream: TcpStream,
    hub: mpsc::UnboundedSender<HubEvent>,
    commands: mpsc::UnboundedSender<OperatorCommand>,
) {
    let Ok(mut ws) = tokio_tungstenite::accept_async(stream).await else {
        return;
    };
    let (tx, mut rx) = mpsc::unbounded_channel();
    if hub.send(HubEvent::Register(id, tx)).is_err() {
        let _ = ws.close(None).await;
        return;
    }
    loop {
        tokio::select! {
            incoming = ws.next() => {
                let violation = match incoming {
                    None | Some(Err(_)) => break,
                    Some(Ok(Message::Text(text))) => match parse_client_message(&text) {
                        Ok(d) => {
                            let _ = commands.send(OperatorCommand {
                                engagement_id: d.engagement_id,
                                choice: d.decision,
                                operator_id: d.operator_id,
                                token: id,
                            });
                            continue;
                        }
                        Err(v) => v,
                    },
                    Some(Ok(Message::Binary(_))) => ProtocolViolation::BinaryFrame,
                    Some(Ok(Message::Close(_))) => break,
                    Some(Ok(_)) => continue,
                };
                let reason = violation.to_string();
                let _ = ws.send(Message::Text(ServerMessage::Error { reason: reason.clone() }.to_text())).await;
                let frame = CloseFrame { code: CloseCode::Policy, reason: reason.into() };
                let _ = ws.close(Some(frame)).await;
                break;
            }
            out = rx.recv() => match out {
                Some(Outgoing::Text(t)) => {
                    if ws.send(Message::Text(t)).await.is_err() {
                        break;
                    }
                }
                Some(Outgoing::Close) | None => {
                    let _ = ws.close(None).await;
                    break;
                }
            },
        }
    }
    let _ = hub.send(HubEvent::Unregister(id));
}

/// A running service; `wait` returns the finished run.
pub struct Server {
    pub local_addr: SocketAddr,
    result: tokio::task::JoinHandle<RunResult>,
}

impl Server {
    pub async fn wait(self) -> RunResult {
        self.result.await.expect("simulation task panicked")
    }
}

/// Serves `sim` on `listener`, pacing one tick per `tick_interval`.
pub fn start(mut sim: Simulation, listener: TcpListener, options: ServeOptions) -> Server {
    let local_addr = listener.local_addr().expect("bound listener has an address");
    let (hub_tx, hub_rx) = mpsc::unbounded_channel();
    let (cmd_tx, mut cmd_rx) = mpsc::unbounded_channel::<OperatorCommand>();
    let (stop_tx, mut stop_rx) = watch::channel(false);
    tokio::spawn(hub(hub_rx, sim.console_snapshot()));

    let accept_hub = hub_tx.clone();
    tokio::spawn(async move {
        let mut next_id = 0u64;
        loop {
            tokio::select! {
                accepted = listener.accept() => {
                    let Ok((stream, _)) = accepted else { continue };
                    next_id += 1;
                    tokio::spawn(session(next_id, stream, accept_hub.clone(), cmd_tx.clone()));
                }
                _ = stop_rx.changed() => return,
            }
        }
    });

    let result = tokio::spawn(async move {
        let mut interval = tokio::time::interval(options.tick_interval.max(Duration::from_micros(1)));
        interval.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
        while !sim.is_finished() {
            interval.tick().await;
            let mut commands = Vec::new();
            while let Ok(c) = cmd_rx.try_recv() {
                commands.push(c);
            }
            let out = sim.tick(commands);
            let _ = hub_tx.send(HubEvent::Tick(out));
        }
        let _ = stop_tx.send(true);
        // Decisions that arrived after the last tick are refused.
        let mut late = TickOutput::default();
        while let Ok(c) = cmd_rx.try_recv() {
            late.acks.extend(sim.tick(vec![c]).acks);
        }
        let _ = hub_tx.send(HubEvent::Tick(late));
        let (done_tx, done_rx) = oneshot::channel();
        if hub_tx.send(HubEvent::Shutdown(done_tx)).is_ok() {
            let _ = done_rx.await;
        }
        sim.finish()
    });
    Server { local_addr, result }
}
