"""
Result envelopes and their CSV / JSON / xlsx writers and readers.

Every file embeds the full input parameter set so that ``rerun`` can
reproduce it: CSV as a leading ``# params=<json>`` comment line, JSON in the
``params`` block of the envelope and xlsx in a ``params`` sheet.
"""
import io
import json
import os
import sys
from datetime import datetime
from typing import Any, Dict, Optional

import pandas as pd

from psstspy.config import VERSION, WIGNER_CONVENTION
from psstspy.exception import PsstsParameterError
from psstspy.log import log_debug
from psstspy.model import GridSpec, OutputFormat, PsstsModel

PARAMS_PREFIX = "# params="


class ResultEnvelope(PsstsModel):
    params: Dict[str, Any]
    values: Dict[str, list]
    summary: Dict[str, Any] = {}
    metadata: Dict[str, Any] = {}

    @staticmethod
    def build(
        params: Dict[str, Any], frame: pd.DataFrame, summary: Optional[Dict[str, Any]] = None, elapsed: float = 0.0
    ) -> "ResultEnvelope":
        return ResultEnvelope(
            params=params,
            values={column: frame[column].tolist() for column in frame.columns},
            summary=summary or {},
            metadata={
                "version": VERSION,
                "convention": WIGNER_CONVENTION,
                # volatile; excluded when outputs are compared
                "run": {
                    "generated_at": datetime.now().strftime("%Y-%m-%d %H:%M:%S"),
                    "elapsed_seconds": elapsed,
                },
            },
        )

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.values)


def _params_line(params: Dict[str, Any]) -> str:
    return PARAMS_PREFIX + json.dumps(params, sort_keys=True, ensure_ascii=False)


class ResultWriter(object):
    def __init__(self, out: Optional[str] = None, fmt: OutputFormat = OutputFormat.CSV):
        if fmt == OutputFormat.XLSX and not out:
            raise PsstsParameterError("out", out, "xlsx output needs a file path")
        self._out = out
        self._fmt = fmt

    def write(self, envelope: ResultEnvelope) -> None:
        if self._fmt == OutputFormat.CSV:
            self._write_text(self.render_csv(envelope))
            if envelope.summary and self._out:
                stem, _ = os.path.splitext(self._out)
                with open(f"{stem}.summary.json", "w", encoding="utf-8") as f:
                    json.dump(self._summary_only(envelope), f, ensure_ascii=False, indent=2)
        elif self._fmt == OutputFormat.JSON:
            self._write_text(json.dumps(envelope.model_dump(mode="json"), ensure_ascii=False, indent=2) + "\n")
        else:
            self._write_xlsx(envelope)
        log_debug("wrote %s output to %s", self._fmt.value, self._out or "stdout")

    @staticmethod
    def render_csv(envelope: ResultEnvelope) -> str:
        buffer = io.StringIO()
        buffer.write(_params_line(envelope.params) + "\n")
        envelope.to_frame().to_csv(buffer, index=False, lineterminator="\n")
        return buffer.getvalue()

    @staticmethod
    def _summary_only(envelope: ResultEnvelope) -> Dict[str, Any]:
        data = envelope.model_dump(mode="json")
        data.pop("values")
        return data

    def _write_text(self, text: str) -> None:
        if not self._out:
            sys.stdout.write(text)
            return
        with open(self._out, "w", encoding="utf-8", newline="") as f:
            f.write(text)

    def _write_xlsx(self, envelope: ResultEnvelope) -> None:
        params = pd.DataFrame(
            {"key": list(envelope.params), "value": [json.dumps(v, ensure_ascii=False) for v in envelope.params.values()]}
        )
        with pd.ExcelWriter(self._out, engine="openpyxl") as writer:
            envelope.to_frame().to_excel(writer, sheet_name="values", index=False)
            params.to_excel(writer, sheet_name="params", index=False)
            if envelope.summary:
                summary = pd.DataFrame(
                    {
                        "key": list(envelope.summary),
                        "value": [json.dumps(v, ensure_ascii=False) for v in envelope.summary.values()],
                    }
                )
                summary.to_excel(writer, sheet_name="summary", index=False)


class ParamsLoader(object):
    """
    Reads the embedded parameter block (and the values table) back from any output file.
    """

    def load_params(self, filename: str) -> Dict[str, Any]:
        suffix = os.path.splitext(filename)[1].lower()
        try:
            if suffix == ".json":
                return self._from_json(filename)
            if suffix == ".xlsx":
                return self._from_xlsx(filename)
            return self._from_csv(filename)
        except FileNotFoundError:
            raise PsstsParameterError("path", filename, "file does not exist")

    def load_values(self, filename: str) -> pd.DataFrame:
        suffix = os.path.splitext(filename)[1].lower()
        if suffix == ".json":
            with open(filename, "r", encoding="utf-8") as f:
                return pd.DataFrame(json.load(f)["values"])
        if suffix == ".xlsx":
            return pd.read_excel(filename, sheet_name="values")
        return pd.read_csv(filename, comment="#", float_precision="round_trip")

    @staticmethod
    def _from_json(filename: str) -> Dict[str, Any]:
        with open(filename, "r", encoding="utf-8") as f:
            data = json.load(f)
        if "params" not in data:
            raise PsstsParameterError("path", filename, "no params block in JSON envelope")
        return data["params"]

    @staticmethod
    def _from_csv(filename: str) -> Dict[str, Any]:
        with open(filename, "r", encoding="utf-8") as f:
            first = f.readline().rstrip("\n")
        if not first.startswith(PARAMS_PREFIX):
            raise PsstsParameterError("path", filename, "first line is not a '# params=' comment")
        return json.loads(first[len(PARAMS_PREFIX):])

    @staticmethod
    def _from_xlsx(filename: str) -> Dict[str, Any]:
        df = pd.read_excel(filename, sheet_name="params")
        return {str(key): json.loads(value) for key, value in zip(df["key"], df["value"])}


__all__ = [
    "GridSpec",
    "ResultEnvelope",
    "ResultWriter",
    "ParamsLoader",
    "PARAMS_PREFIX",
]
