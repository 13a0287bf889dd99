//! Any fitted classifier that can be saved to and loaded from a model file.

use std::path::Path;

use crate::baseline::{LogisticModel, MultinomialModel};
use crate::data::Schema;
use crate::error::{Error, Result};
use crate::evaluation::Classifier;
use crate::forest::Forest;
use crate::textfmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Forest(Forest),
    Logistic(LogisticModel),
    Multinomial(MultinomialModel),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Forest(_) => "forest",
            Model::Logistic(_) => "logistic",
            Model::Multinomial(_) => "multinomial",
        }
    }

    pub fn classifier(&self) -> &dyn Classifier {
        match self {
            Model::Forest(f) => f,
            Model::Logistic(m) => m,
            Model::Multinomial(m) => m,
        }
    }

    pub fn schema(&self) -> &Schema {
        self.classifier().schema()
    }

    pub fn to_text(&self) -> String {
        match self {
            Model::Forest(f) => f.to_text(),
            Model::Logistic(m) => m.to_text(),
            Model::Multinomial(m) => m.to_text(),
        }
    }

    /// Dispatches on the tag of the first record.
    pub fn from_text(text: &str) -> Result<Model> {
        let (_, first) = textfmt::content_lines(text)
            .next()
            .ok_or_else(|| Error::Schema("empty model file".into()))?;
        match first.split_whitespace().next().unwrap_or("") {
            "forest" => Ok(Model::Forest(Forest::from_text(text)?)),
            "logistic" => Ok(Model::Logistic(LogisticModel::from_text(text)?)),
            "multinomial" => Ok(Model::Multinomial(MultinomialModel::from_text(text)?)),
            other => Err(Error::Schema(format!("unknown model type {other:?}"))),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Model> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Model::from_text(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::{fit_logistic, TrainOptions};
    use crate::data::Dataset;
    use crate::forest::{fit_forest, preset};

    fn data() -> Dataset {
        let schema = Schema::new(vec!["x".into()], vec!["a".into(), "b".into()]).unwrap();
        let rows = (0..40).map(|i| (vec![i as f64], usize::from(i >= 20))).collect();
        Dataset::from_rows(schema, rows).unwrap()
    }

    #[test]
    fn dispatch_round_trip() {
        let d = data();
        let mut config = preset("rf1").unwrap();
        config.n_trees = 3;
        config.beta = 5;
        let f = Model::Forest(fit_forest(&d, &d.all_rows(), config).unwrap());
        let l = Model::Logistic(fit_logistic(&d, &d.all_rows(), &TrainOptions::default()).unwrap());
        for m in [f, l] {
            let back = Model::from_text(&m.to_text()).unwrap();
            assert_eq!(back.kind(), m.kind());
            assert_eq!(back.to_text(), m.to_text());
            assert_eq!(back.classifier().predict(&[30.0]).unwrap(), 1);
        }
        assert!(matches!(Model::from_text("bogus x=1\n"), Err(Error::Schema(_))));
        assert!(matches!(Model::from_text(""), Err(Error::Schema(_))));
    }
}
