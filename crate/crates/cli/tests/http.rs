mod common;

use std::io::{BufRead, BufReader};
use std::process::{Child, ChildStdout, Command, ExitStatus, Stdio};
use std::time::Duration;

use futures::StreamExt;
use serde_json::{json, Value};
use tempfile::TempDir;

use common::{code, run_in, sctkit, synthesized};

struct Server {
    child: Child,
    // Held so the server can keep writing to its stdout.
    _stdout: BufReader<ChildStdout>,
    base: String,
    dir: TempDir,
}

impl Server {
    fn start(delta: &str) -> Server {
        let (dir, _) = synthesized();
        let mut child = sctkit()
            .current_dir(dir.path())
            .args(["serve", "super.sup", "--port", "0", "--delta", delta, "--log", "session.json"])
            .stdout(Stdio::piped())
            .spawn()
            .unwrap();
        let mut out = BufReader::new(child.stdout.take().unwrap());
        let mut line = String::new();
        out.read_line(&mut line).unwrap();
        let base = line.trim().strip_prefix("listening on ").expect("address line").to_string();
        Server { child, _stdout: out, base, dir }
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    fn terminate(&mut self) -> ExitStatus {
        Command::new("kill").args(["-TERM", &self.child.id().to_string()]).status().unwrap();
        self.child.wait().unwrap()
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

async fn post(client: &reqwest::Client, url: String, body: Value) -> (u16, Value) {
    let r = client.post(url).json(&body).send().await.unwrap();
    (r.status().as_u16(), r.json().await.unwrap())
}

#[tokio::test]
async fn wire_protocol_acknowledges_with_post_tick_mode() {
    let server = Server::start("0.1");
    let client = reqwest::Client::new();

    let state: Value = client.get(server.url("/state")).send().await.unwrap().json().await.unwrap();
    assert_eq!(state["mode"], "POWER_OFF");
    for key in ["state", "period", "log_tail"] {
        assert!(state.get(key).is_some(), "{key}");
    }

    let events = client.get(server.url("/events")).send().await.unwrap();
    assert_eq!(events.headers()["content-type"], "application/x-ndjson");
    let mut stream = events.bytes_stream();

    let (s, ack) = post(&client, server.url("/inject"), json!({"group": "power", "event": "MIE1"})).await;
    assert_eq!((s, ack["mode"].as_str()), (200, Some("STANDBY")));
    let (s, ack) = post(&client, server.url("/rc"), json!({"stick": "MIE3", "switch": "MIE6"})).await;
    assert_eq!((s, ack["mode"].as_str()), (200, Some("LOITER")));
    let (s, ack) = post(&client, server.url("/inject"), json!({"group": "RC", "event": "ATE12"})).await;
    assert_eq!((s, ack["mode"].as_str()), (200, Some("RTL")));

    let mut buf = String::new();
    let mut modes = Vec::new();
    while !modes.contains(&"RTL".to_string()) {
        let chunk = tokio::time::timeout(Duration::from_secs(10), stream.next()).await.unwrap().unwrap().unwrap();
        buf.push_str(std::str::from_utf8(&chunk).unwrap());
        while let Some(i) = buf.find('\n') {
            let rec: Value = serde_json::from_str(&buf[..i]).unwrap();
            for key in ["period", "mode", "mce", "consumed"] {
                assert!(rec.get(key).is_some(), "{key} in {rec}");
            }
            if !rec["mce"].is_null() {
                modes.push(rec["mode"].as_str().unwrap().to_string());
            }
            buf.drain(..=i);
        }
    }
    let changes: Vec<&String> = modes.iter().fold(Vec::new(), |mut v, m| {
        if v.last() != Some(&m) {
            v.push(m);
        }
        v
    });
    assert_eq!(changes, ["STANDBY", "LOITER", "RTL"]);

    let state: Value = client.get(server.url("/state")).send().await.unwrap().json().await.unwrap();
    assert_eq!(state["mode"], "RTL");
}

#[tokio::test]
async fn malformed_messages_get_structured_errors() {
    let server = Server::start("0.1");
    let client = reqwest::Client::new();
    let r = client
        .post(server.url("/inject"))
        .header("content-type", "application/json")
        .body("not json")
        .send()
        .await
        .unwrap();
    assert_eq!(r.status().as_u16(), 400);
    let body: Value = r.json().await.unwrap();
    assert!(body["error"].is_string());

    let (s, body) = post(&client, server.url("/inject"), json!({"group": "radar", "event": "ATE1"})).await;
    assert_eq!(s, 400);
    assert!(body["error"].as_str().unwrap().contains("radar"));
    let (s, _) = post(&client, server.url("/inject"), json!({"group": "RC", "event": "ATE1"})).await;
    assert_eq!(s, 400);
    let (s, _) = post(&client, server.url("/rc"), json!({})).await;
    assert_eq!(s, 400);
    // A bad switch value rejects the whole message, stick included.
    let (s, _) = post(&client, server.url("/rc"), json!({"stick": "MIE3", "switch": "MIE9"})).await;
    assert_eq!(s, 400);
    let state: Value = client.get(server.url("/state")).send().await.unwrap().json().await.unwrap();
    assert_eq!(state["mode"], "POWER_OFF");
}

#[tokio::test]
async fn ticks_follow_the_configured_period() {
    let server = Server::start("0.25");
    let client = reqwest::Client::new();
    tokio::time::sleep(Duration::from_millis(1100)).await;
    let state: Value = client.get(server.url("/state")).send().await.unwrap().json().await.unwrap();
    let period = state["period"].as_u64().unwrap();
    assert!((2..=5).contains(&period), "period {period}");
    assert_eq!(state["mode"], "POWER_OFF");
}

#[tokio::test]
async fn sigterm_flushes_the_log() {
    let mut server = Server::start("0.1");
    let client = reqwest::Client::new();
    let (_, ack) = post(&client, server.url("/inject"), json!({"group": "power", "event": "MIE1"})).await;
    assert_eq!(ack["mode"], "STANDBY");
    assert!(server.terminate().success());
    let log: Value = serde_json::from_str(&std::fs::read_to_string(server.dir.path().join("session.json")).unwrap()).unwrap();
    assert_eq!(log["mode"], "STANDBY");
    assert!(log["log"].as_array().unwrap().iter().any(|r| r["mce"] == "MCE2"));
}

#[test]
fn port_in_use_exits_one() {
    let server = Server::start("1");
    let port = server.base.rsplit(':').next().unwrap();
    let o = run_in(server.dir.path(), &["serve", "super.sup", "--port", port]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("port in use"));
}
