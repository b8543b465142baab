mod common;

use axum::http::StatusCode;
use common::{
    app, call, command, connect, create, next_output, send_binary, send_text, serve, Socket,
};
use gesture_rps::config::Settings;
use gesture_rps::game::Phase;
use gesture_rps::session::{SessionEvent, SessionOutput};
use gesture_rps::{
    synthetic, wire, Command, Frame, FrameRole, GameSnapshot, Gesture, Session, SessionOptions,
};
use serde_json::json;

fn offline(id: &str, seed: u64) -> Session {
    let opts = SessionOptions {
        seed: Some(seed),
        ..Default::default()
    };
    Session::new(id, &Settings::default(), &opts, None).unwrap()
}

fn frame_of(out: &SessionOutput) -> &gesture_rps::FrameResult {
    match out {
        SessionOutput::Frame(f) => f,
        other => panic!("expected frame result, got {other:?}"),
    }
}

fn state_of(out: SessionOutput) -> GameSnapshot {
    match out {
        SessionOutput::State(s) => s,
        other => panic!("expected state, got {other:?}"),
    }
}

fn error_code(out: &SessionOutput) -> &str {
    match out {
        SessionOutput::Error { code, .. } => code,
        other => panic!("expected error, got {other:?}"),
    }
}

async fn stream(
    ws: &mut Socket,
    mirror: &mut Session,
    role: FrameRole,
    frame: Frame,
    as_json: bool,
) -> SessionOutput {
    let got = if as_json {
        send_text(ws, wire::encode_json(&frame, role)).await
    } else {
        send_binary(ws, wire::encode_binary(&frame, role)).await
    };
    assert_eq!(got, mirror.handle(SessionEvent::Frame(role, frame)));
    got
}

#[tokio::test]
async fn full_round_matches_offline_replay() {
    let app = app();
    let addr = serve(app.clone()).await;
    let id = create(&app, json!({"seed": 7})).await;
    let mut mirror = offline(&id, 7);
    let mut ws = connect(addr, &id).await;

    let bg = stream(
        &mut ws,
        &mut mirror,
        FrameRole::Background,
        synthetic::background_frame(),
        false,
    )
    .await;
    assert_eq!(frame_of(&bg).gesture.label, Gesture::Unknown);
    for i in 0..5 {
        stream(
            &mut ws,
            &mut mirror,
            FrameRole::Live,
            synthetic::rock_frame(),
            i % 2 == 1,
        )
        .await;
    }

    for cmd in [Command::Calibrate, Command::StartMatch] {
        let (status, v) = command(&app, &id, serde_json::to_value(&cmd).unwrap()).await;
        assert_eq!(status, StatusCode::OK, "{v}");
        let expected = state_of(mirror.handle(SessionEvent::Command(cmd)));
        assert_eq!(serde_json::from_value::<GameSnapshot>(v).unwrap(), expected);
    }
    assert_eq!(mirror.phase(), Phase::InMatch);

    for _ in 0..5 {
        let out = stream(
            &mut ws,
            &mut mirror,
            FrameRole::Live,
            synthetic::rock_frame(),
            false,
        )
        .await;
        assert_eq!(frame_of(&out).gesture.label, Gesture::Rock);
        assert!(frame_of(&out).hull.len() >= 3);
    }

    let (status, v) = command(&app, &id, json!({"cmd": "next_round"})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["countdown"], 3);
    state_of(mirror.handle(SessionEvent::Command(Command::NextRound)));

    let mut countdowns = vec![];
    let reveal = loop {
        let pushed = state_of(next_output(&mut ws).await);
        assert_eq!(pushed, state_of(mirror.handle(SessionEvent::Tick)));
        countdowns.push(pushed.countdown);
        if pushed.countdown.is_none() {
            break pushed;
        }
    };
    assert_eq!(countdowns, [Some(2), Some(1), None]);
    let report = reveal.last_round.clone().expect("round was played");
    assert_eq!(report.record.player, Gesture::Rock);

    let (_, state) = call(&app, "GET", &format!("/sessions/{id}/state"), None).await;
    let state: GameSnapshot = serde_json::from_value(state).unwrap();
    assert_eq!(state.history.last(), Some(&report.record));
    assert_eq!(state, reveal);
}

#[tokio::test]
async fn rejects_bad_frames_without_losing_the_socket() {
    let app = app();
    let addr = serve(app.clone()).await;
    let id = create(&app, json!({})).await;
    let mut ws = connect(addr, &id).await;

    let live = wire::encode_binary(&synthetic::rock_frame(), FrameRole::Live);
    assert_eq!(
        error_code(&send_binary(&mut ws, live).await),
        "background_missing"
    );
    assert_eq!(
        error_code(&send_binary(&mut ws, vec![1, 2, 3]).await),
        "bad_frame"
    );
    let small = Frame::filled(8, 8, [0, 0, 0, 255]);
    let out = send_binary(&mut ws, wire::encode_binary(&small, FrameRole::Background)).await;
    assert_eq!(error_code(&out), "frame_size");
    assert_eq!(
        error_code(&send_text(&mut ws, "{\"role\":1}".into()).await),
        "bad_frame"
    );

    let bg = wire::encode_binary(&synthetic::background_frame(), FrameRole::Background);
    assert!(matches!(
        send_binary(&mut ws, bg).await,
        SessionOutput::Frame(_)
    ));
}

#[tokio::test]
async fn unknown_session_socket_is_refused() {
    let app = app();
    let addr = serve(app).await;
    let err = tokio_tungstenite::connect_async(format!("ws://{addr}/sessions/missing/frames"))
        .await
        .unwrap_err();
    assert!(err.to_string().contains("404"), "{err}");
}

async fn drive(addr: std::net::SocketAddr, id: String, seed: u64, shape: fn() -> Frame) {
    let mut mirror = offline(&id, seed);
    let mut ws = connect(addr, &id).await;
    stream(
        &mut ws,
        &mut mirror,
        FrameRole::Background,
        synthetic::background_frame(),
        false,
    )
    .await;
    for i in 0..12 {
        stream(&mut ws, &mut mirror, FrameRole::Live, shape(), i % 3 == 0).await;
        tokio::task::yield_now().await;
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_sessions_do_not_interfere() {
    let app = app();
    let addr = serve(app.clone()).await;
    let a = create(&app, json!({"seed": 1})).await;
    let b = create(&app, json!({"seed": 2})).await;
    let c = create(&app, json!({"seed": 3})).await;
    tokio::join!(
        drive(addr, a, 1, synthetic::rock_frame),
        drive(addr, b, 2, synthetic::paper_frame),
        drive(addr, c, 3, synthetic::scissors_frame),
    );
}

#[tokio::test]
async fn two_sockets_on_one_session_both_see_countdown() {
    let app = app();
    let addr = serve(app.clone()).await;
    let id = create(&app, json!({"seed": 5})).await;
    let mut first = connect(addr, &id).await;
    let mut second = connect(addr, &id).await;
    let mut mirror = offline(&id, 5);
    stream(
        &mut first,
        &mut mirror,
        FrameRole::Background,
        synthetic::background_frame(),
        false,
    )
    .await;
    for _ in 0..5 {
        stream(
            &mut first,
            &mut mirror,
            FrameRole::Live,
            synthetic::paper_frame(),
            false,
        )
        .await;
    }
    for cmd in ["calibrate", "start_match", "next_round"] {
        let (status, v) = command(&app, &id, json!({"cmd": cmd})).await;
        assert_eq!(status, StatusCode::OK, "{cmd}: {v}");
    }
    for ws in [&mut first, &mut second] {
        let mut countdowns = vec![];
        for _ in 0..3 {
            countdowns.push(state_of(next_output(ws).await).countdown);
        }
        assert_eq!(countdowns, [Some(2), Some(1), None]);
    }
}
