import json
import xml.etree.ElementTree as ET

import pytest

from nashlab.corpus import ORIGIN2, spec
from nashlab.regularity import analyze
from nashlab.report import analysis_report, dumps
from nashlab.svg import emit_plot, report_svg


def report_for(name, base=ORIGIN2):
    return json.loads(dumps(analysis_report(analyze(spec(name), base))))


def test_plot_is_wellformed_svg_with_annotation(tmp_path):
    path = tmp_path / "cusp.svg"
    emit_plot(report_for("cusp"), str(path))
    root = ET.parse(path).getroot()
    assert root.tag.endswith("svg")
    assert "α̂ = 0.33" in path.read_text()


def test_graph_family_draws_each_graph():
    text = report_svg(report_for("f_pm"))
    assert text.count("<polyline") == 3


def test_too_few_samples_is_rejected():
    report = report_for("cusp")
    key = next(iter(report["samples"]))
    report["samples"][key] = report["samples"][key][:5]
    with pytest.raises(ValueError):
        report_svg(report)


def test_unwritable_path(tmp_path):
    with pytest.raises(OSError):
        emit_plot(report_for("cusp"), str(tmp_path / "no" / "such" / "dir.svg"))
