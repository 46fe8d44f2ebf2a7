"""
CSV 数据表读写
每张表以 `# key=value` 元数据行开头，随后是列名与数据行。
浮点数用 repr 输出（最短可往返表示），同样的输入总是得到逐字节相同的文件
"""

import csv
import io
import logging
import sys
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .duality import AmplitudeField, Space, TransverseGrid
from .errors import DataIOError, ValidationError

logger = logging.getLogger(__name__)


def format_value(value) -> str:
    """数值单元格格式"""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def render_table(columns: Sequence[str], rows: Iterable[Sequence], metadata: Optional[Dict[str, object]] = None) -> str:
    buffer = io.StringIO()
    for key, value in (metadata or {}).items():
        buffer.write(f"# {key}={format_value(value)}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def save_table(
    output_path: Optional[Path],
    columns: Sequence[str],
    rows: Iterable[Sequence],
    metadata: Optional[Dict[str, object]] = None,
) -> str:
    """
    写出数据表

    Args:
        output_path: 输出路径，None 表示写到标准输出
        columns: 列名
        rows: 数据行
        metadata: 表头元数据

    Returns:
        写出的文本

    Raises:
        DataIOError: 写文件失败
    """
    text = render_table(columns, rows, metadata)
    if output_path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return text

    try:
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(output_path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as e:
        raise DataIOError(f"Failed to write {output_path}: {e}")
    logger.info(f"Generated: {output_path}")
    return text


def load_table(input_path: Path) -> Tuple[Dict[str, str], List[str], List[List[str]]]:
    """
    读取数据表

    Returns:
        (metadata, columns, rows)

    Raises:
        DataIOError: 文件不存在、无法读取或没有列名行
    """
    if not input_path.exists():
        raise DataIOError(f"Input table not found: {input_path}")
    try:
        text = input_path.read_text(encoding="utf-8")
    except OSError as e:
        raise DataIOError(f"Failed to read {input_path}: {e}")

    metadata: Dict[str, str] = {}
    body = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            entry = stripped.lstrip("#").strip()
            if "=" in entry:
                key, value = entry.split("=", 1)
                metadata[key.strip()] = value.strip()
            continue
        body.append(line)

    if not body:
        raise DataIOError(f"{input_path}: no header row found")
    reader = csv.reader(body)
    columns = [c.strip() for c in next(reader)]
    rows = [[cell.strip() for cell in row] for row in reader if row]
    return metadata, columns, rows


def _metadata_number(path: Path, metadata: Dict[str, str], key: str, kind=float):
    if key not in metadata:
        raise DataIOError(f"{path}: missing '# {key}=' header line")
    try:
        return kind(metadata[key])
    except ValueError:
        raise DataIOError(f"{path}: bad '# {key}={metadata[key]}' header line")


def save_amplitude_field(output_path: Optional[Path], field: AmplitudeField) -> str:
    """按 (x, y, re, im) 列写出振幅场，行序为 x 外层、y 内层"""
    prefix = field.space.value
    x, y = field.grid.mesh()
    samples = field.samples
    rows = (
        (x[i, j], y[i, j], samples[i, j].real, samples[i, j].imag)
        for i in range(field.grid.n)
        for j in range(field.grid.n)
    )
    metadata = {
        "space": prefix,
        "k": field.wave_number,
        "n": field.grid.n,
        "extent": field.grid.extent,
    }
    return save_table(output_path, [f"{prefix}x", f"{prefix}y", "re", "im"], rows, metadata)


def load_amplitude_field(input_path: Path) -> AmplitudeField:
    """
    读取 save_amplitude_field 写出的振幅表

    Raises:
        DataIOError: 表头或行数不符
    """
    metadata, columns, rows = load_table(input_path)
    try:
        space = Space.parse(metadata.get("space", ""))
    except ValidationError as e:
        raise DataIOError(f"{input_path}: {e}")
    k = _metadata_number(input_path, metadata, "k")
    n = _metadata_number(input_path, metadata, "n", int)
    extent = _metadata_number(input_path, metadata, "extent")
    grid = TransverseGrid(n, extent)

    if len(columns) != 4:
        raise DataIOError(f"{input_path}: expected 4 columns (x, y, re, im), got {len(columns)}")
    if len(rows) != n * n:
        raise DataIOError(f"{input_path}: expected {n * n} rows for n={n}, got {len(rows)}")

    try:
        values = np.array([complex(float(row[2]), float(row[3])) for row in rows])
    except (ValueError, IndexError) as e:
        raise DataIOError(f"{input_path}: malformed amplitude row: {e}")
    logger.debug(f"Loaded {space.value}-space field n={n} from {input_path}")
    return AmplitudeField(grid, values.reshape(n, n), space, k)
