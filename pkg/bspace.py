#!/usr/bin/env python3
"""
b 空间光与物质相互作用模拟工具
主入口文件
"""

import sys
import argparse
import logging
from pathlib import Path
from typing import List, Optional

# 添加项目根目录到Python路径
SCRIPT_DIR = Path(__file__).parent
sys.path.insert(0, str(SCRIPT_DIR))

from src.config import load_run_config
from src.errors import BspaceError, DataIOError, IntegrationError, UsageError
from src.figures import (
    FIGURES,
    run_beam_profile,
    run_correlate,
    run_cross_section,
    run_evolve,
    run_transform,
)

EXIT_OK = 0

SUBCOMMANDS = {
    "beam-profile": "光束径向剖面：b, theta_V, intensity_ratio, phase",
    "evolve": "积分耦合通道方程，输出振幅轨迹",
    "fig2": "R = 2.718 时 P(τ)，解析解与数值积分对照",
    "fig3": "R = 1/2, π/2, π 的 P(τ) 曲线",
    "fig4": "高斯光束上转移概率随 R(b) 的扫描",
    "fig5": "高斯光束强度比随涡旋角的变化",
    "transform": "b ↔ q 傅里叶变换振幅表",
    "cross-section": "两种表示下的总截面与 Parseval 检查",
    "correlate": "为 (b, P_joint, P_1..P_N) 表追加关联指标",
}

INPUT_COMMANDS = ("transform", "cross-section", "correlate")


def setup_logging(verbose: bool = False):
    """设置日志"""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler()],
        force=True,
    )


class _Parser(argparse.ArgumentParser):
    """用法错误走 UsageError（退出码 1），退出码 2 留给数值失败"""

    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="bspace.py",
        description="b 空间光与物质相互作用模拟工具",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例:
  python bspace.py fig2 --out fig2.csv                      # 复现 P(τ), R = 2.718
  python bspace.py fig4 --set drive.coupling_strength=4.0   # 换一个 R(0)
  python bspace.py beam-profile --config run.ini -v         # 显示详细日志
  python bspace.py cross-section --input amplitudes.csv     # Parseval 检查
退出码: 0 成功, 1 验证错误, 2 数值失败, 3 I/O 错误
        """,
    )
    subparsers = parser.add_subparsers(dest="command", metavar="<subcommand>", parser_class=_Parser)
    subparsers.required = True

    for name, help_text in SUBCOMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text, description=help_text)
        sub.add_argument("--config", type=Path, help="INI 配置文件路径")
        sub.add_argument("--out", type=Path, help="输出 CSV 路径（默认标准输出）")
        sub.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="覆盖配置项，如 drive.coupling_strength=1.5（可重复）",
        )
        sub.add_argument("-v", "--verbose", action="store_true", help="显示详细日志")
        if name in INPUT_COMMANDS:
            sub.add_argument("--input", type=Path, help="输入数据表路径")

    return parser


def run_command(command: str, config, input_path: Optional[Path]) -> str:
    if command in FIGURES:
        return FIGURES[command](config)
    if command == "beam-profile":
        return run_beam_profile(config)
    if command == "evolve":
        return run_evolve(config)
    if command == "transform":
        return run_transform(config, input_path)
    if command == "cross-section":
        return run_cross_section(config, input_path)
    if command == "correlate":
        return run_correlate(config, input_path)
    raise UsageError(f"Unknown subcommand: {command}")


def main(argv: Optional[List[str]] = None) -> int:
    """主函数，返回退出码"""
    logger = logging.getLogger(__name__)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        setup_logging(False)
        logger.error(f"✗ bspace: {e}")
        return e.exit_code

    verbose = args.verbose
    setup_logging(verbose)
    command = args.command
    try:
        config = load_run_config(args.config, args.overrides, command, args.out)
        run_command(command, config, getattr(args, "input", None))
        logger.info(f"✓ {command} done")
        return EXIT_OK

    except BspaceError as e:
        logger.error(f"✗ {command} failed: {e}")
        code = e.exit_code
    except OSError as e:
        logger.error(f"✗ {command} failed: {e}")
        code = DataIOError.exit_code
    except Exception as e:
        # 未归类的失败按数值错误处理
        logger.error(f"✗ {command} failed unexpectedly: {e}")
        code = IntegrationError.exit_code

    if verbose:
        import traceback

        traceback.print_exc()
    return code


if __name__ == "__main__":
    sys.exit(main())
