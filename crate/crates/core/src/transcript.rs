//! Line-delimited transcript and audit files, and the play driver.
//!
//! A transcript file is one `{"header": …}` line followed by one move record
//! per line. Every scalar is a rational string, so a file read back and
//! written again is byte-identical.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::adversary::{BobAdversary, BobConfig, BobKind};
use crate::error::{Error, Result};
use crate::game::{run_game, GameParams, GameTranscript, MoveRecord, ProductBall};
use crate::strategy::{AuditRecord, Mode, StrategyConstants, StrategyState};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranscriptHeader {
    pub game: GameParams,
    pub mode: Mode,
    pub certified: bool,
    pub constants: StrategyConstants,
    pub bob: BobConfig,
    pub rounds: usize,
    pub budget: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeaderLine {
    header: TranscriptHeader,
}

/// Everything needed to play one game.
#[derive(Clone, Debug)]
pub struct PlaySetup {
    pub constants: StrategyConstants,
    pub bob: BobConfig,
    pub rounds: usize,
    pub budget: u64,
    /// Bob's balls when `bob.kind` is replay.
    pub script: Vec<ProductBall>,
}

#[derive(Clone, Debug)]
pub struct PlayOutcome {
    pub header: TranscriptHeader,
    pub transcript: GameTranscript,
    pub audit: Vec<AuditRecord>,
}

/// Alice's strategy against the configured Bob.
pub fn play(setup: &PlaySetup) -> Result<PlayOutcome> {
    let c = &setup.constants;
    let params = GameParams::potential(c.beta.clone(), c.gamma.clone());
    let mut bob = BobAdversary::new(setup.bob.clone(), c.initial.clone(), c.beta.clone())?;
    if setup.bob.kind == BobKind::Replay {
        if setup.script.first() != Some(&c.initial) {
            return Err(Error::invalid("replay script must open with the initial ball"));
        }
        bob = bob.with_script(setup.script.clone());
    }
    let mut alice = StrategyState::new(c.clone()).with_budget(setup.budget);
    let transcript = run_game(&params, &mut alice, &mut bob, setup.rounds)?;
    let header = TranscriptHeader {
        game: params,
        mode: c.mode,
        certified: c.is_certified(),
        constants: c.clone(),
        bob: setup.bob.clone(),
        rounds: setup.rounds,
        budget: setup.budget,
    };
    Ok(PlayOutcome {
        header,
        transcript,
        audit: alice.audit,
    })
}

pub fn write_transcript<W: Write>(mut w: W, header: &TranscriptHeader, t: &GameTranscript) -> Result<()> {
    if header.game != t.params {
        return Err(Error::invalid("header and transcript disagree on the game parameters"));
    }
    serde_json::to_writer(&mut w, &HeaderLine { header: header.clone() })?;
    w.write_all(b"\n")?;
    for m in &t.moves {
        serde_json::to_writer(&mut w, m)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn transcript_string(header: &TranscriptHeader, t: &GameTranscript) -> Result<String> {
    let mut buf = Vec::new();
    write_transcript(&mut buf, header, t)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

fn parse_err(line: usize, e: impl std::fmt::Display) -> Error {
    Error::Parse(format!("transcript line {line}: {e}"))
}

pub fn read_transcript<R: BufRead>(r: R) -> Result<(TranscriptHeader, GameTranscript)> {
    let mut lines = r.lines().enumerate().filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty()));
    let (_, first) = lines.next().ok_or_else(|| Error::Parse("empty transcript".into()))?;
    let header = serde_json::from_str::<HeaderLine>(&first?).map_err(|e| parse_err(1, e))?.header;
    let mut t = GameTranscript::new(header.game.clone());
    for (i, line) in lines {
        let rec: MoveRecord = serde_json::from_str(&line?).map_err(|e| parse_err(i + 1, e))?;
        t.moves.push(rec);
    }
    Ok((header, t))
}

pub fn load_transcript(path: &Path) -> Result<(TranscriptHeader, GameTranscript)> {
    read_transcript(BufReader::new(File::open(path)?))
}

pub fn save_transcript(path: &Path, header: &TranscriptHeader, t: &GameTranscript) -> Result<()> {
    write_transcript(BufWriter::new(File::create(path)?), header, t)
}

/// Bob's balls from a transcript file, in order, for replay.
pub fn load_bob_script(path: &Path) -> Result<Vec<ProductBall>> {
    let (_, t) = load_transcript(path)?;
    Ok(t.bob_balls().cloned().collect())
}

pub fn write_audit<W: Write>(mut w: W, audit: &[AuditRecord]) -> Result<()> {
    for rec in audit {
        serde_json::to_writer(&mut w, rec)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_audit<R: BufRead>(r: R) -> Result<Vec<AuditRecord>> {
    r.lines()
        .enumerate()
        .filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty()))
        .map(|(i, l)| serde_json::from_str(&l?).map_err(|e| Error::Parse(format!("audit line {}: {e}", i + 1))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ratio};
    use crate::geometry::RationalDirection;
    use crate::strategy::setup_demo_constants;

    fn setup(kind: BobKind, rounds: usize) -> PlaySetup {
        let initial = ProductBall::new(ratio(3, 4), [ratio(1, 20), ratio(1, 30), ratio(1, 2)], ratio(1, 10)).unwrap();
        let constants = setup_demo_constants(&initial, &ratio(1, 2), &int(1), &int(16), &ratio(1, 1 << 20)).unwrap();
        PlaySetup {
            constants,
            bob: BobConfig {
                kind,
                seed: 7,
                shrink: ratio(1, 2),
                target: Some(RationalDirection::new(0, 0, 1).unwrap()),
                script: None,
                rng: "chacha8".into(),
            },
            rounds,
            budget: 1 << 20,
            script: Vec::new(),
        }
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let out = play(&setup(BobKind::Random, 8)).unwrap();
        let s = transcript_string(&out.header, &out.transcript).unwrap();
        let (h, t) = read_transcript(s.as_bytes()).unwrap();
        assert_eq!(h, out.header);
        assert_eq!(t, out.transcript);
        assert_eq!(transcript_string(&h, &t).unwrap(), s);
        assert!(s.lines().next().unwrap().starts_with("{\"header\":"));
        assert_eq!(s.lines().count(), 1 + 2 * 8);
    }

    #[test]
    fn replay_reproduces_the_game() {
        let out = play(&setup(BobKind::GreedyCusp, 10)).unwrap();
        let s = transcript_string(&out.header, &out.transcript).unwrap();
        let mut again = setup(BobKind::Replay, 10);
        again.script = out.transcript.bob_balls().cloned().collect();
        let replayed = play(&again).unwrap();
        assert_eq!(replayed.transcript, out.transcript);
        // only the header's Bob kind differs
        let mut h = replayed.header.clone();
        h.bob = out.header.bob.clone();
        assert_eq!(transcript_string(&h, &replayed.transcript).unwrap(), s);
    }

    #[test]
    fn audit_round_trips() {
        let out = play(&setup(BobKind::GreedyCusp, 12)).unwrap();
        assert_eq!(out.audit.len(), 12);
        let mut buf = Vec::new();
        write_audit(&mut buf, &out.audit).unwrap();
        assert_eq!(read_audit(buf.as_slice()).unwrap(), out.audit);
    }

    #[test]
    fn malformed_lines_are_reported() {
        let err = read_transcript("{\"header\":{}}\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        assert!(matches!(read_transcript("".as_bytes()), Err(Error::Parse(_))));
    }

    #[test]
    fn replay_must_open_with_the_initial_ball() {
        let mut s = setup(BobKind::Replay, 3);
        s.script = vec![ProductBall::new(ratio(3, 4), [int(0), int(0), int(0)], ratio(1, 20)).unwrap()];
        assert!(play(&s).is_err());
    }
}
