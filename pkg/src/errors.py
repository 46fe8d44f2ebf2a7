"""
异常类型
所有模块抛出的错误都归入这里，CLI 按 exit_code 返回退出码
"""

from typing import Optional


class BspaceError(Exception):
    """项目内所有错误的基类"""

    exit_code = 1


class ValidationError(BspaceError, ValueError):
    """输入不满足物理或数学约束（如 λ <= 0、非厄米耦合矩阵）"""

    exit_code = 1


class UsageError(BspaceError, ValueError):
    """调用方式错误（如空列表、错误的空间标签、未知通道）"""

    exit_code = 1


class IntegrationError(BspaceError, RuntimeError):
    """数值积分失败"""

    exit_code = 2

    def __init__(self, message: str, time: Optional[float] = None, impact_parameter=None):
        self.time = time
        self.impact_parameter = impact_parameter
        details = []
        if time is not None:
            details.append(f"t={time!r}")
        if impact_parameter is not None:
            details.append(f"b={impact_parameter}")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)


class DataIOError(BspaceError, OSError):
    """文件读写失败或表格格式错误"""

    exit_code = 3
