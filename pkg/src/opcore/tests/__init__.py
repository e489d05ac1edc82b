# this is a package

import os

DATA = os.path.join(os.path.dirname(os.path.dirname(__file__)), 'data')


def datafile(name):
    return os.path.join(DATA, name)


def readData(name):
    with open(datafile(name), 'rb') as f:
        return f.read()
