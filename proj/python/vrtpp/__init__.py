from vrtpp._vrtpp import *  # noqa: F401,F403
