//! Finite normal-form games with losses in `[0,1]`.
//!
//! Loss tensors are dense and row-major over joint action profiles
//! `(a_1, ..., a_m)` with `a_1` varying slowest. Actions are 0-based.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::SimplexVector;

#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    action_counts: Vec<usize>,
    strides: Vec<usize>,
    losses: Vec<Vec<f64>>,
}

/// On-disk JSON layout of a game.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    players: usize,
    actions: Vec<usize>,
    losses: Vec<Vec<f64>>,
}

fn validate_shape(action_counts: &[usize]) -> Result<()> {
    if action_counts.len() < 2 {
        return Err(Error::InvalidShape(format!(
            "need at least 2 players, got {}",
            action_counts.len()
        )));
    }
    if let Some((i, &n)) = action_counts.iter().enumerate().find(|(_, &n)| n < 2) {
        return Err(Error::InvalidShape(format!(
            "player {i} has {n} actions; at least 2 required"
        )));
    }
    Ok(())
}

fn profile_count(action_counts: &[usize]) -> Result<usize> {
    action_counts
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .ok_or_else(|| Error::InvalidShape("profile count overflows".into()))
}

impl Game {
    pub fn new(action_counts: Vec<usize>, losses: Vec<Vec<f64>>) -> Result<Self> {
        validate_shape(&action_counts)?;
        let size = profile_count(&action_counts)?;
        if losses.len() != action_counts.len() {
            return Err(Error::mismatch(
                "number of loss tensors",
                action_counts.len(),
                losses.len(),
            ));
        }
        for (player, tensor) in losses.iter().enumerate() {
            if tensor.len() != size {
                return Err(Error::mismatch(
                    format!("loss tensor of player {player}"),
                    size,
                    tensor.len(),
                ));
            }
            for (index, &value) in tensor.iter().enumerate() {
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::LossOutOfRange {
                        player,
                        index,
                        value,
                    });
                }
            }
        }
        let m = action_counts.len();
        let mut strides = vec![1usize; m];
        for i in (0..m - 1).rev() {
            strides[i] = strides[i + 1] * action_counts[i + 1];
        }
        Ok(Game {
            action_counts,
            strides,
            losses,
        })
    }

    /// Every entry of every loss tensor drawn uniformly from `[0,1)`.
    ///
    /// The stream is ChaCha8 seeded with `seed`; entries are drawn player by
    /// player in storage order, so a given `(shape, seed)` always yields the
    /// same game.
    pub fn random(action_counts: &[usize], seed: u64) -> Result<Self> {
        validate_shape(action_counts)?;
        let size = profile_count(action_counts)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let losses = (0..action_counts.len())
            .map(|_| (0..size).map(|_| rng.gen::<f64>()).collect())
            .collect();
        Game::new(action_counts.to_vec(), losses)
    }

    /// A game where every player has loss `c` on every profile.
    pub fn constant(action_counts: &[usize], c: f64) -> Result<Self> {
        validate_shape(action_counts)?;
        let size = profile_count(action_counts)?;
        Game::new(
            action_counts.to_vec(),
            vec![vec![c; size]; action_counts.len()],
        )
    }

    pub fn num_players(&self) -> usize {
        self.action_counts.len()
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn num_profiles(&self) -> usize {
        self.strides[0] * self.action_counts[0]
    }

    pub fn loss_tensor(&self, player: usize) -> &[f64] {
        &self.losses[player]
    }

    pub fn profile_index(&self, actions: &[usize]) -> usize {
        actions.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    /// Decodes a flat profile index into per-player actions.
    pub fn profile_actions(&self, mut index: usize, out: &mut [usize]) {
        for (i, &s) in self.strides.iter().enumerate() {
            out[i] = index / s;
            index %= s;
        }
    }

    pub fn loss(&self, player: usize, actions: &[usize]) -> f64 {
        self.losses[player][self.profile_index(actions)]
    }

    pub fn check_profile(&self, profile: &StrategyProfile) -> Result<()> {
        if profile.strategies.len() != self.num_players() {
            return Err(Error::mismatch(
                "number of strategies in profile",
                self.num_players(),
                profile.strategies.len(),
            ));
        }
        for (i, (x, &n)) in profile.strategies.iter().zip(&self.action_counts).enumerate() {
            if x.dimension() != n {
                return Err(Error::mismatch(format!("strategy of player {i}"), n, x.dimension()));
            }
        }
        Ok(())
    }

    /// `ℓ_i[j] = E_{a_{-i} ~ x_{-i}} Λ_i(j, a_{-i})`.
    pub fn expected_loss(&self, profile: &StrategyProfile, player: usize) -> Result<Vec<f64>> {
        self.check_profile(profile)?;
        if player >= self.num_players() {
            return Err(Error::InvalidShape(format!("no player {player}")));
        }
        let m = self.num_players();
        let tensor = &self.losses[player];
        let mut out = vec![0.0; self.action_counts[player]];
        let mut actions = vec![0usize; m];
        for (idx, &value) in tensor.iter().enumerate() {
            let mut weight = 1.0;
            for (i, &a) in actions.iter().enumerate() {
                if i != player {
                    weight *= profile.strategies[i][a];
                }
            }
            out[actions[player]] += weight * value;
            // odometer, last player fastest
            debug_assert_eq!(idx, self.profile_index(&actions));
            for i in (0..m).rev() {
                actions[i] += 1;
                if actions[i] < self.action_counts[i] {
                    break;
                }
                actions[i] = 0;
            }
        }
        Ok(out)
    }

    /// Loss vectors of all players against the same frozen profile.
    pub fn expected_losses(&self, profile: &StrategyProfile) -> Result<Vec<Vec<f64>>> {
        (0..self.num_players())
            .map(|i| self.expected_loss(profile, i))
            .collect()
    }

    pub fn to_json(&self) -> Vec<u8> {
        let file = GameFile {
            players: self.num_players(),
            actions: self.action_counts.clone(),
            losses: self.losses.clone(),
        };
        let mut bytes = serde_json::to_vec(&file).expect("game serializes");
        bytes.push(b'\n');
        bytes
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let file: GameFile =
            serde_json::from_slice(bytes).map_err(|e| parse_error(bytes, &e))?;
        if file.players != file.actions.len() {
            return Err(Error::InvalidShape(format!(
                "\"players\" is {} but {} action counts given",
                file.players,
                file.actions.len()
            )));
        }
        Game::new(file.actions, file.losses)
    }
}

/// Converts a serde_json line/column position into a byte offset.
pub(crate) fn parse_error(bytes: &[u8], err: &serde_json::Error) -> Error {
    let line = err.line();
    let column = err.column();
    let mut offset = 0;
    if line > 0 {
        for (i, chunk) in bytes.split_inclusive(|&b| b == b'\n').enumerate() {
            if i + 1 == line {
                offset += column.saturating_sub(1).min(chunk.len());
                break;
            }
            offset += chunk.len();
        }
    }
    Error::Parse {
        offset: offset.min(bytes.len()),
        message: err.to_string(),
    }
}

/// One mixed strategy per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub strategies: Vec<SimplexVector>,
}

impl StrategyProfile {
    pub fn new(strategies: Vec<SimplexVector>) -> Self {
        StrategyProfile { strategies }
    }

    pub fn uniform(action_counts: &[usize]) -> Self {
        StrategyProfile {
            strategies: action_counts.iter().map(|&n| SimplexVector::uniform(n)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(xs: &[&[f64]]) -> StrategyProfile {
        StrategyProfile::new(xs.iter().map(|x| SimplexVector::new(x.to_vec()).unwrap()).collect())
    }

    /// Naive sum over every joint profile, independent of the odometer.
    fn brute_force_loss(game: &Game, profile: &StrategyProfile, player: usize) -> Vec<f64> {
        let mut out = vec![0.0; game.action_counts()[player]];
        let mut actions = vec![0; game.num_players()];
        for idx in 0..game.num_profiles() {
            game.profile_actions(idx, &mut actions);
            let w: f64 = (0..game.num_players())
                .filter(|&i| i != player)
                .map(|i| profile.strategies[i][actions[i]])
                .product();
            out[actions[player]] += w * game.loss(player, &actions);
        }
        out
    }

    #[test]
    fn deterministic_opponent_selects_column() {
        let game = Game::new(vec![2, 3], vec![
            vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
            vec![0.0; 6],
        ])
        .unwrap();
        let p = profile(&[&[0.5, 0.5], &[0.0, 0.0, 1.0]]);
        assert_eq!(game.expected_loss(&p, 0).unwrap(), vec![0.3, 0.6]);
    }

    #[test]
    fn constant_game_gives_constant_loss() {
        let game = Game::constant(&[3, 2, 2], 0.37).unwrap();
        let p = profile(&[&[0.2, 0.3, 0.5], &[0.9, 0.1], &[0.4, 0.6]]);
        for i in 0..3 {
            for v in game.expected_loss(&p, i).unwrap() {
                assert!((v - 0.37).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn matching_pennies_bilinear_value() {
        let game = Game::new(vec![2, 2], vec![vec![0.0, 1.0, 1.0, 0.0], vec![0.0; 4]]).unwrap();
        let p = profile(&[&[0.5, 0.5], &[0.3, 0.7]]);
        let l = game.expected_loss(&p, 0).unwrap();
        let oracle = brute_force_loss(&game, &p, 0);
        assert!((l[0] - 0.7).abs() < 1e-15 && (l[1] - 0.3).abs() < 1e-15);
        assert_eq!(l, oracle);
    }

    #[test]
    fn dimension_mismatch_names_player() {
        let game = Game::random(&[2, 3], 1).unwrap();
        let p = profile(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let err = game.expected_loss(&p, 0).unwrap_err();
        assert!(err.to_string().contains("player 1"), "{err}");
    }

    #[test]
    fn random_game_is_deterministic_and_in_range() {
        let a = Game::random(&[2, 2], 1).unwrap();
        let b = Game::random(&[2, 2], 1).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.loss_tensor(0).len() + a.loss_tensor(1).len(), 8);
        assert!(a.losses.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
        let c = Game::random(&[2, 2], 2).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Game::random(&[3], 0).is_err());
        assert!(Game::random(&[2, 1], 0).is_err());
        assert!(Game::new(vec![2, 2], vec![vec![0.0; 4]]).is_err());
        assert!(Game::new(vec![2, 2], vec![vec![0.0; 4], vec![0.0; 3]]).is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let game = Game::random(&[2, 3, 2], 9).unwrap();
        let back = Game::from_json(&game.to_json()).unwrap();
        assert_eq!(game, back);

        let bad = br#"{"players":2,"actions":[2,2],"losses":[[0,0,0,1.5],[0,0,0,0]]}"#;
        assert!(matches!(
            Game::from_json(bad),
            Err(Error::LossOutOfRange { player: 0, index: 3, .. })
        ));

        let text = game.to_json();
        let truncated = &text[..text.len() / 2];
        match Game::from_json(truncated) {
            Err(Error::Parse { offset, .. }) => assert!(offset <= truncated.len()),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_error_offset_points_at_bad_token() {
        let text = b"{\"players\": 2,\n \"actions\": [2, x]}";
        match Game::from_json(text) {
            Err(Error::Parse { offset, .. }) => assert_eq!(text[offset], b'x'),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn oracle_agreement_small_games() {
        for (seed, shape) in [(1u64, vec![2, 2]), (2, vec![3, 2]), (3, vec![3, 3, 3]), (4, vec![2, 3, 2])] {
            let game = Game::random(&shape, seed).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
            let strategies = shape
                .iter()
                .map(|&n| {
                    let w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 0.01).collect();
                    let s: f64 = w.iter().sum();
                    SimplexVector::new(w.iter().map(|v| v / s).collect()).unwrap()
                })
                .collect();
            let p = StrategyProfile::new(strategies);
            for i in 0..shape.len() {
                let fast = game.expected_loss(&p, i).unwrap();
                let slow = brute_force_loss(&game, &p, i);
                for (a, b) in fast.iter().zip(&slow) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }
}
