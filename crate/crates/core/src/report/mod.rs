//! CSV and SVG output for benchmark measurements.

pub mod csv;
pub mod svg;

pub use self::csv::{read_csv, read_csv_from, write_csv, write_csv_to, CsvRow, CSV_HEADER};
pub use self::svg::{emit_all_plots, emit_plot, render_plot, FigureKind, PlotSpec};
