//! End-to-end compilation: spec text to SVG.

use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

use crate::assemble::{assemble, AssembleError, Context, ResolvedAnnotation};
use crate::chart::{infer_scales, nice_scales, validate, ChartError, EncodingType, Scales};
use crate::data::{load_csv, load_json_rows, ColumnType, DataError, DataTable};
use crate::diag::{Diagnostic, Diagnostics, Severity};
use crate::placement::{build_grid, PlacementResult, DEFAULT_BUDGET, DEFAULT_CELL_SIZE};
use crate::render::render_svg;
use crate::resolve::{resolve_target, ResolveError};
use crate::scene::{build_scene, SceneGraph};
use crate::spec::{bind, parse_spec_str, DataSource, Spec, SpecError};

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub cell_size: f64,
    pub budget: usize,
    /// Treat warnings as errors.
    pub strict: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { cell_size: DEFAULT_CELL_SIZE, budget: DEFAULT_BUDGET, strict: false }
    }
}

#[derive(Debug, Error)]
pub enum CompileError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("data: {0}")]
    Data(DataError),
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error("{source}")]
    Resolve { path: String, source: ResolveError },
    #[error(transparent)]
    Assemble(#[from] AssembleError),
    #[error("{} warning(s) promoted to errors", .0.len())]
    Strict(Vec<Diagnostic>),
}

impl CompileError {
    pub fn code(&self) -> &str {
        match self {
            CompileError::Spec(e) => e.code(),
            CompileError::Data(e) => e.code(),
            CompileError::Chart(e) => e.code(),
            CompileError::Resolve { source, .. } => source.code(),
            CompileError::Assemble(e) => e.code(),
            CompileError::Strict(d) => d.first().map_or("Strict", |d| d.code.as_str()),
        }
    }

    pub fn path(&self) -> String {
        match self {
            CompileError::Spec(e) => e.path().to_string(),
            CompileError::Data(_) => "/data".into(),
            CompileError::Chart(e) => e.path(),
            CompileError::Resolve { path, .. } => path.clone(),
            CompileError::Assemble(e) => e.path().to_string(),
            CompileError::Strict(d) => d.first().map(|d| d.path.clone()).unwrap_or_default(),
        }
    }

    /// Failure reading an input file, as opposed to invalid content.
    pub fn is_io(&self) -> bool {
        matches!(self, CompileError::Data(DataError::Io { .. }))
    }

    /// Diagnostics describing this failure, one per line on stderr.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            CompileError::Strict(d) => d
                .iter()
                .map(|d| Diagnostic { severity: Severity::Error, ..d.clone() })
                .collect(),
            e => vec![Diagnostic::error(e.code(), e.path(), e.to_string())],
        }
    }
}

#[derive(Debug, Clone)]
pub struct Output {
    pub spec: Spec,
    pub svg: String,
    pub scene: SceneGraph,
    pub scales: Scales,
    pub data: DataTable,
    pub annotations: Vec<ResolvedAnnotation>,
    pub placements: Vec<PlacementResult>,
    pub diagnostics: Vec<Diagnostic>,
    pub rounds: usize,
}

/// Loads the data a spec points at; `url` is relative to `base_dir`.
pub fn load_data(spec: &Spec, base_dir: &Path) -> Result<DataTable, CompileError> {
    match &spec.data {
        DataSource::Values(rows) => DataTable::from_json_rows(rows).map_err(CompileError::Data),
        DataSource::Url(url) => {
            let path = base_dir.join(url);
            if path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("json")) {
                return load_json_rows(&path).map_err(CompileError::Data);
            }
            let hints: HashMap<String, ColumnType> = spec
                .chart
                .encodings()
                .filter(|(_, e)| e.ty == EncodingType::Temporal)
                .map(|(_, e)| (e.field.clone(), ColumnType::Temporal))
                .collect();
            load_csv(&path, &hints).map_err(CompileError::Data)
        }
    }
}

/// Compiles a parsed spec against its data.
pub fn compile_spec(spec: &Spec, data: DataTable, opts: &Options) -> Result<Output, CompileError> {
    let mut diags = Diagnostics::new();
    validate(&spec.chart, &data)?;
    let spec = bind(spec, &data.schema())?;
    let mut scales = infer_scales(&spec.chart, &data)?;
    nice_scales(&spec.chart, &mut scales);
    let scene = build_scene(&spec.chart, &data, &scales, &mut diags)?;

    let mut targets = Vec::with_capacity(spec.annotations.len());
    for (ri, root) in spec.annotations.iter().enumerate() {
        let mut resolved = Vec::with_capacity(root.targets.len());
        for (ti, t) in root.targets.iter().enumerate() {
            let path = format!("/annotations/{ri}/targets/{ti}");
            let r = resolve_target(t, &scene, &data, &scales, &mut diags, &path)
                .map_err(|source| CompileError::Resolve { path, source })?;
            resolved.push(r);
        }
        targets.push(resolved);
    }

    let mut grid = build_grid(&scene, opts.cell_size);
    let ctx = Context { scene: &scene, scales: &scales, data: &data };
    let assembly = assemble(&spec, &ctx, targets, &mut grid, opts.budget, &mut diags)?;
    let diagnostics = diags.into_vec();
    if opts.strict && !diagnostics.is_empty() {
        return Err(CompileError::Strict(diagnostics));
    }
    let svg = render_svg(&scene, &assembly.annotations);
    Ok(Output {
        spec,
        svg,
        scene,
        scales,
        data,
        annotations: assembly.annotations,
        placements: assembly.placements,
        diagnostics,
        rounds: assembly.rounds,
    })
}

/// Parses, loads and compiles spec text.
pub fn compile_str(text: &str, base_dir: &Path, opts: &Options) -> Result<Output, CompileError> {
    let spec = parse_spec_str(text)?;
    let data = load_data(&spec, base_dir)?;
    compile_spec(&spec, data, opts)
}

/// Compiles the spec file at `path`.
pub fn compile_file(path: &Path, opts: &Options) -> Result<Output, CompileError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CompileError::Data(DataError::Io { path: path.display().to_string(), message: e.to_string() })
    })?;
    compile_str(&text, path.parent().unwrap_or(Path::new(".")), opts)
}
