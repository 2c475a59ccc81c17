use std::fs;

use abwl::certify::{CertifyError, ScoringSpec};
use abwl::words::{Alphabet, Morphism, Word, WordError};
use thiserror::Error;

use crate::MorphismArgs;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    BallBox(#[from] abwl::ballbox::BallBoxError),
    #[error(transparent)]
    Avoid(#[from] abwl::avoid::AvoidError),
    #[error(transparent)]
    Sieve(#[from] abwl::sieve::SieveError),
    #[error(transparent)]
    Template(#[from] abwl::template::TemplateError),
}

pub fn morphism(a: &MorphismArgs) -> Result<Morphism, CliError> {
    match (&a.morphism, &a.images) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Read {
                path: path.display().to_string(),
                source,
            })?;
            Ok(Morphism::from_json(&text)?)
        }
        (None, Some(images)) => {
            if images.len() < 2 || images.len() > 26 {
                return Err(CliError::Usage(
                    "--images needs between 2 and 26 images".into(),
                ));
            }
            let alphabet = Alphabet::new(('a'..='z').take(images.len()).collect())?;
            let words = images
                .iter()
                .map(|s| alphabet.parse(s))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Morphism::new(alphabet, words)?)
        }
        (None, None) => Err(CliError::Usage(
            "one of --morphism or --images is required".into(),
        )),
    }
}

/// `a=1,b=3` over `Z/group`, ordered by the morphism's alphabet.
pub fn scoring(
    h: &Morphism,
    group: Option<i64>,
    scores: Option<&str>,
) -> Result<Option<ScoringSpec>, CliError> {
    let (n, text) = match (group, scores) {
        (None, None) => return Ok(None),
        (Some(n), Some(s)) => (n, s),
        _ => return Err(CliError::Usage("--group and --scores go together".into())),
    };
    let ab = h.alphabet();
    let mut values: Vec<Option<i64>> = vec![None; ab.len()];
    for part in text.split(',') {
        let (l, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("bad score {part:?}, expected letter=value")))?;
        let mut chars = l.trim().chars();
        let c = match (chars.next(), chars.next()) {
            (Some(c), None) => c,
            _ => return Err(CliError::Usage(format!("bad letter {l:?}"))),
        };
        let v: i64 = v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad score value {v:?}")))?;
        values[ab.index_of(c)? as usize] = Some(v);
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| CliError::Usage(format!("no score for {}", ab.letters()[i]))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Some(ScoringSpec::cyclic(n, &values)?))
}

pub fn seed_letter(h: &Morphism, seed: char) -> Result<u8, CliError> {
    Ok(h.alphabet().index_of(seed)?)
}

pub fn words(alphabet: &Alphabet, list: &[String]) -> Result<Vec<Word>, CliError> {
    list.iter()
        .filter(|s| !s.is_empty())
        .map(|s| alphabet.parse(s).map_err(CliError::from))
        .collect()
}
