"""
Followed conventions:
 - https://specifications.freedesktop.org/basedir-spec/basedir-spec-latest.html
 - https://refspecs.linuxfoundation.org/FHS_3.0/fhs/ch03s15.html

Discussion:
 - https://askubuntu.com/questions/14535/whats-the-local-folder-for-in-my-home-directory
"""

import os
import re
from pathlib import Path
from typing import List

from tarotools.tatra.common import ConfigFileNotFoundError

CONFIG_DIR = 'tatra'
CONFIG_FILE = 'tatra.toml'
_LOG_FILE = 'tatra.log'


def _is_root():
    return os.geteuid() == 0


def default_config_file_path() -> Path:
    """Config file shipped with the package, documenting every attribute."""
    config_path = Path(__file__).parent / 'config' / CONFIG_FILE
    if not config_path.exists():
        raise ConfigFileNotFoundError(CONFIG_FILE, [config_path.parent])
    return config_path


def lookup_config_file() -> Path:
    """Returns the first `tatra.toml` found in the search path
    :return: config file path
    :raise ConfigFileNotFoundError: when config lookup failed
    """
    search_path = config_file_search_path()
    for config_dir in search_path:
        config = config_dir / CONFIG_FILE
        if config.exists():
            return config

    raise ConfigFileNotFoundError(CONFIG_FILE, search_path)


def config_file_search_path() -> List[Path]:
    """Sorted list of directories in which the program should look for configuration files:

    1. Current working directory
    2. ${XDG_CONFIG_HOME}/tatra or defaults to ${HOME}/.config/tatra
    3. ${XDG_CONFIG_DIRS}/tatra or defaults to /etc/xdg/tatra
    4. /etc/tatra

    Related discussion: https://stackoverflow.com/questions/1024114
    :return: list of directories for configuration file lookup
    """
    return [Path.cwd()] + [path / CONFIG_DIR for path in [xdg_config_home(), *xdg_config_dirs(), Path('/etc')]]


def xdg_config_home() -> Path:
    if os.environ.get('XDG_CONFIG_HOME'):
        return Path(os.environ['XDG_CONFIG_HOME'])
    else:
        return Path.home() / '.config'


def xdg_config_dirs() -> List[Path]:
    if os.environ.get('XDG_CONFIG_DIRS'):
        return [Path(path) for path in re.split(r":", os.environ['XDG_CONFIG_DIRS'])]
    else:
        return [Path('/etc/xdg')]


def log_file_path(create: bool) -> Path:
    """
    1. Root user: /var/log/tatra/{log-file}
    2. Non-root user: ${XDG_CACHE_HOME}/tatra/{log-file} or default to ${HOME}/.cache/tatra

    :param create: create path directories if not exist
    :return: log file path
    """

    if _is_root():
        path = Path('/var/log')
    else:
        if os.environ.get('XDG_CACHE_HOME'):
            path = Path(os.environ['XDG_CACHE_HOME'])
        else:
            home = Path.home()
            path = home / '.cache'

    if create:
        os.makedirs(path / CONFIG_DIR, exist_ok=True)

    return path / CONFIG_DIR / _LOG_FILE
